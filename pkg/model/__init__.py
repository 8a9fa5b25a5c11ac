# Инициализация пакета model
