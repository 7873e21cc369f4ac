# Utilidades: configuración, serialización y validación de argumentos
