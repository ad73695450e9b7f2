# Utils package for VGDL Forge
