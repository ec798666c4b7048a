"""
Infrastructure - Erros, configuração YAML e escrita de CSV
Versão: 1.0
Data: 2026-10-12
"""
