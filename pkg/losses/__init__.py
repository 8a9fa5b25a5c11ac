# Инициализация пакета losses
