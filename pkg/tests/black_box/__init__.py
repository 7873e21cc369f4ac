"""
Black Box Tests - la CLI vista desde fuera: argumentos, JSON y códigos de salida
"""
