# Инициализация пакета utils 