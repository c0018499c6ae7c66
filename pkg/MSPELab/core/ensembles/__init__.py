# MSPELab - Ensembles Module
# Módulo contendo os amostradores de Monte Carlo dos ensembles de referência
