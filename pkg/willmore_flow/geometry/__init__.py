# Curve Geometry Module