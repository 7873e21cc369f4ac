"""
Integration tests - suites de verificación completas
"""
