# __init__.py
# All comments and identifiers in English

