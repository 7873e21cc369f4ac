"""
rado-actions: grafo aleatorio, acciones de grupo y construcciones genéricas
"""
