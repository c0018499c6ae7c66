# MSPELab - Tests Module
# Módulo contendo todos os testes da aplicação
