# Quantum simulation package
