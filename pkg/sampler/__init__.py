# Challenge sampling package
