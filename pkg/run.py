#!/usr/bin/env python3
"""
Main execution script for the GCME toolkit.

Same commands as the ``gcme`` console script, runnable from a checkout:

  poetry run python run.py check --config data/configs/check_pure_gauge.ini
  poetry run python run.py calibrate --out reports
"""

from src.cli.main import main

if __name__ == "__main__":
    exit(main())
