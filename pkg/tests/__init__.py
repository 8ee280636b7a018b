"""Тесты для Document Translator."""
