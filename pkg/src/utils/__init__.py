"""Utilities package for the rescue-games solver"""
