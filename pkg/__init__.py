# Zero-knowledge LCH proof system package
