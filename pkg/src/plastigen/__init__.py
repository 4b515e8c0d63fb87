"""Grammatical evolution with asocial and social lifetime learning."""
