# Finite Element Module