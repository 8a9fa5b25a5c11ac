# Инициализация пакета storage
