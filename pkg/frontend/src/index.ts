export { Grid, GeoShadowError, makeGrid, checkGrid, checkCongruent } from "./grid.js";
export { readGeoTiff, writeGeoTiff } from "./geotiff.js";
export { removeSmallRegions, agreementMasks, ndvi, shadowLoss, SupervisionBundle } from "./masks.js";
export {
  castShadows,
  projectShadows,
  CastOptions,
  ProjectOptions,
  ShadowProduct,
  RpcModel,
} from "./cli.js";
