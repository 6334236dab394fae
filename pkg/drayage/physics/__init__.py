### makes 'drayage.physics' a package so relative imports work
