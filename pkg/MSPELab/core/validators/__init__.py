# MSPELab - Validators Module
# Módulo contendo a validação estrutural e de orçamento das configurações de experimento
