# MSPELab - MSPE Module
# Módulo contendo o ensemble projetado de estados mistos e seus momentos
