# MSPELab - Metrics Module
# Módulo contendo distâncias entre momentos e entropias de Rényi
