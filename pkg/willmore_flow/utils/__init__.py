# Utilities Module