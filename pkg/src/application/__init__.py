# Módulo de montagem, solução e pós-processamento
# Versão: 1.0
# Data: 2026-10-14
