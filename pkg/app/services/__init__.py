# Servicios: scheduler de requisitos y suites de verificación
