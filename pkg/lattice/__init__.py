# Инициализация пакета lattice
