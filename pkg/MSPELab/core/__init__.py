# MSPELab - Core Module
# Módulo principal contendo a lógica numérica do ensemble projetado de estados mistos

__version__ = "1.0.0"
__author__ = "MSPELab Team"
