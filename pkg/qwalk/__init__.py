# QWalk Lattice simulation package
