"""
Test suite de rado-actions
"""
