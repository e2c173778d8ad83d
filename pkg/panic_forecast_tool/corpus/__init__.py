# panic_forecast_tool/corpus/__init__.py
# All comments and identifiers in English
