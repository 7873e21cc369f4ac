"""
Concurrency tests - backends y automorfismos compartidos entre hilos
"""
