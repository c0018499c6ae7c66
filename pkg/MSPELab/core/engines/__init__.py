# MSPELab - Engines Module
# Módulo contendo os motores numéricos (álgebra linear, circuitos, permutações)
