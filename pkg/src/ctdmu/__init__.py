"""Countdown mu-calculus workbench."""
