# Sparse Linear Algebra Module