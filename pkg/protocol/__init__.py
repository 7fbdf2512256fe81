# Protocol package
