#!/usr/bin/env python3
"""
sgfrwt - Spectral graph fractional wavelet transforms

Entry point for the sgfrwt CLI. All logic lives in core/.
"""

from core.cli_commands import cli

if __name__ == "__main__":
    cli()
