from openpyxl import Workbook

CERTIFICATE_HEADERS = ["Family", "N", "p", "Operator", "Ratio", "Witness SHA-256", "Grid n"]
FIT_HEADERS = ["Model", "a", "b", "R²", "Residual", "Winner"]


def write_workbook(scan, path):
	'''Growth scan as an .xlsx workbook: one sheet of certificates and one of model fits.'''
	workbook = Workbook(write_only=True)
	worksheet = workbook.create_sheet(title="Certificates")
	worksheet.append(CERTIFICATE_HEADERS)
	for row in scan.rows():
		worksheet.append([row['family'], row['N'], row['p'], row['operator'], row['ratio'], row['witness_hash'], row['grid_n']])

	worksheet = workbook.create_sheet(title="Fits")
	worksheet.append(FIT_HEADERS)
	for name, fit in scan.fits.items():
		worksheet.append([name, fit['a'], fit['b'], fit['r2'], fit['residual'], "yes" if name == scan.winner else ""])
	workbook.save(path)
	workbook.close()
	return path
