# MSPELab - Experiments Module
# Módulo contendo a fila de tarefas e o executor de experimentos
