# Инициализация пакета dataset
