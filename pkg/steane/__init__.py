# Steane code package
