# Local Clifford-Hamiltonian package
