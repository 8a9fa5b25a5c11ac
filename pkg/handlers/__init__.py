# Инициализация пакета handlers 