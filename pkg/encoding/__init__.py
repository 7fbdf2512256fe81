# Witness encoding package
