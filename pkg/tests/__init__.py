# Инициализация пакета tests
