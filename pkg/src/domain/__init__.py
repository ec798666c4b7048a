"""
Domain - Malhas, quadratura, espaços de elementos finitos e definição do problema
Versão: 1.0
Data: 2026-10-12
"""
