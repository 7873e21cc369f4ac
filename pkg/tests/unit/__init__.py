"""
Unit tests - un módulo de app/ por archivo
"""
