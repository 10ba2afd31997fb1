"""
Geometry package - Lorentzian tube geometry and Gauss map operators
"""
