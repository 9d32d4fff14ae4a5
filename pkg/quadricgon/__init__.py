"""quadricgon - exact interpolation checks for nodal curves on a smooth quadric."""

__version__ = "0.1.0"
