#!/usr/bin/env python3
"""
Точка входа для запуска конвейера из командной строки.
Импортирует и запускает основную функцию из cli.py
"""

import sys

if __name__ == "__main__":
    from cli import main

    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\nОстановлено пользователем", file=sys.stderr)
        sys.exit(130)
