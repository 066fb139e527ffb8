"""Run helpers for the command line: logging setup and dataset/log file naming"""
