# panic_forecast_tool/discriminator/__init__.py
# All comments and identifiers in English
