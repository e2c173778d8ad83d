# panic_forecast_tool/annotator/__init__.py
# All comments and identifiers in English
