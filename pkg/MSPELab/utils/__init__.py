# MSPELab - Utils Module
# Módulo contendo utilitários: logging, geradores aleatórios e serialização
