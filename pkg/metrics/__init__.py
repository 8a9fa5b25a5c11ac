# Инициализация пакета metrics
