# MSPELab - Models Module
# Módulo contendo os modelos físicos que produzem o estado global |Ψ⟩
