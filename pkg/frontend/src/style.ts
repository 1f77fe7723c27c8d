/**
 * Fixed plot style. Everything that affects bytes lives here so that a given
 * CSV always renders to the identical file.
 */
export const STYLE = {
  width: 640,
  height: 440,
  margin: { left: 64, right: 16, top: 28, bottom: 46 },
  background: "#ffffff",
  axisColor: "#333333",
  gridColor: "#dddddd",
  pointColor: "#1f77b4",
  fitColor: "#d62728",
  guideColor: "#2ca02c",
  secondaryColor: "#9467bd",
  fontFamily: "Helvetica, Arial, sans-serif",
  fontSize: 12,
  titleSize: 14,
  pointRadius: 3.5,
} as const;
